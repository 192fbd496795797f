#pragma once

#include "ebcap/bell.hpp"
#include "ebcap/pauli.hpp"
#include "ebcap/parallel.hpp"
#include "ebcap/aqecc.hpp"
#include "ebcap/capacity.hpp"
#include "ebcap/epp.hpp"
#include "ebcap/oracle.hpp"
#include "ebcap/curve_io.hpp"
#include "ebcap/sweeps.hpp"
