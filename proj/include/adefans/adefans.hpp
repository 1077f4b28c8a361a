#pragma once
// Umbrella header.

#include "rootsys.hpp"
#include "subsys.hpp"
#include "charlat.hpp"
#include "rcomplex.hpp"
#include "fancore.hpp"
#include "fanmaps.hpp"
#include "relations.hpp"
#include "units_eval.hpp"
#include "io.hpp"
#include "verify.hpp"
