#pragma once

#include "forcinglab/error.hpp"
#include "forcinglab/atom.hpp"
#include "forcinglab/permutation.hpp"
#include "forcinglab/action.hpp"
#include "forcinglab/support.hpp"
#include "forcinglab/condition.hpp"
#include "forcinglab/poset.hpp"
#include "forcinglab/antichain.hpp"
#include "forcinglab/generic.hpp"
#include "forcinglab/ordinal.hpp"
#include "forcinglab/names.hpp"
#include "forcinglab/closure.hpp"
#include "forcinglab/pyramid.hpp"
