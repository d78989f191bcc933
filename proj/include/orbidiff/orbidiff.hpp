#pragma once

#include "orbidiff/exactnum.hpp"
#include "orbidiff/poly.hpp"
#include "orbidiff/orbifold.hpp"
#include "orbidiff/adapted.hpp"
#include "orbidiff/galois.hpp"
#include "orbidiff/presheaf.hpp"
#include "orbidiff/render.hpp"
#include "orbidiff/script.hpp"
#include "orbidiff/execute.hpp"
