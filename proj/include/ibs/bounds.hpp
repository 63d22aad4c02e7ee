#pragma once

#include "ibs/bounds/green.hpp"
#include "ibs/bounds/probe.hpp"
#include "ibs/bounds/report.hpp"
