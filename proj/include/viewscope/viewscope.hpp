#pragma once

#include "viewscope/geometry.hpp"
#include "viewscope/scene.hpp"
#include "viewscope/scene_io.hpp"
#include "viewscope/bvh.hpp"
#include "viewscope/features.hpp"
#include "viewscope/raycaster.hpp"
#include "viewscope/framework.hpp"
#include "viewscope/dataset.hpp"
#include "viewscope/trees.hpp"
#include "viewscope/metrics.hpp"
#include "viewscope/importance.hpp"
#include "viewscope/predictor.hpp"
#include "viewscope/config.hpp"
#include "viewscope/fixtures.hpp"
