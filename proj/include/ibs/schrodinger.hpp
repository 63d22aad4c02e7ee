#pragma once

#include "ibs/schrodinger/model.hpp"
#include "ibs/schrodinger/wells.hpp"
#include "ibs/schrodinger/reconstruct.hpp"
