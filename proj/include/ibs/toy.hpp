#pragma once

#include "ibs/toy/comparison.hpp"
#include "ibs/toy/model.hpp"
