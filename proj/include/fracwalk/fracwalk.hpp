#pragma once

#include "fracwalk/common.hpp"
#include "fracwalk/errors.hpp"
#include "fracwalk/gauge.hpp"
#include "fracwalk/graph.hpp"
#include "fracwalk/io.hpp"
#include "fracwalk/reconstruct.hpp"
#include "fracwalk/recovery.hpp"
#include "fracwalk/simulate.hpp"
#include "fracwalk/walk.hpp"
