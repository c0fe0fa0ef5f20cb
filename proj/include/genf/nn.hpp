#pragma once

#include "genf/nn/adam.hpp"
#include "genf/nn/attention.hpp"
#include "genf/nn/dual.hpp"
#include "genf/nn/grad_check.hpp"
#include "genf/nn/lstm.hpp"
#include "genf/nn/ops.hpp"
#include "genf/nn/param_store.hpp"
