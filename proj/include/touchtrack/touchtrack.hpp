#pragma once

#include "touchtrack/analysis.hpp"
#include "touchtrack/config.hpp"
#include "touchtrack/contact.hpp"
#include "touchtrack/error.hpp"
#include "touchtrack/features.hpp"
#include "touchtrack/forest.hpp"
#include "touchtrack/geometry.hpp"
#include "touchtrack/io.hpp"
#include "touchtrack/kinematics.hpp"
#include "touchtrack/neighbor_index.hpp"
#include "touchtrack/segmentation.hpp"
#include "touchtrack/simulator.hpp"
#include "touchtrack/stats.hpp"
#include "touchtrack/surface.hpp"
