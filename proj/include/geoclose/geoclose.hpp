#pragma once

#include "geoclose/element_set.hpp"
#include "geoclose/errors.hpp"
#include "geoclose/perm_group.hpp"
#include "geoclose/closure_system.hpp"
#include "geoclose/rank.hpp"
#include "geoclose/pregeometry.hpp"
#include "geoclose/coordination.hpp"
#include "geoclose/suite.hpp"
#include "geoclose/rank_laws.hpp"
#include "geoclose/independence.hpp"
#include "geoclose/structure_lab.hpp"
#include "geoclose/forking_probe.hpp"
#include "geoclose/spec_io.hpp"
#include "geoclose/report.hpp"
