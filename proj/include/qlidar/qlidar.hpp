#pragma once

#include "qlidar/allocation.hpp"
#include "qlidar/channel.hpp"
#include "qlidar/error.hpp"
#include "qlidar/fading.hpp"
#include "qlidar/gaussian_state.hpp"
#include "qlidar/linalg2.hpp"
#include "qlidar/metrics.hpp"
#include "qlidar/stats.hpp"
#include "qlidar/version.hpp"
