#pragma once

#include "error.hpp"
#include "quad.hpp"
#include "endo.hpp"
#include "curve.hpp"
#include "interval.hpp"
#include "heights.hpp"
#include "polynomial.hpp"
#include "groebner.hpp"
#include "variety.hpp"
#include "structure.hpp"
#include "subgroups.hpp"
#include "unbounded.hpp"
#include "corpus.hpp"
#include "json_io.hpp"
