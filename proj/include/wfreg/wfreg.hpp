// Everything at once.
#pragma once

#include "wfreg/checkers.hpp"
#include "wfreg/constructions.hpp"
#include "wfreg/memory.hpp"
#include "wfreg/monitors.hpp"
#include "wfreg/scheduler.hpp"
#include "wfreg/timestamp.hpp"
#include "wfreg/trace.hpp"
#include "wfreg/trace_io.hpp"
#include "wfreg/types.hpp"
#include "wfreg/verdict.hpp"
