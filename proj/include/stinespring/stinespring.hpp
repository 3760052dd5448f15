#pragma once

// Minimal Stinespring representations for completely positive maps on
// matrix algebras and phi-maps on free Hilbert C*-modules, at finite
// dimension: construction, verification, minimality, and unitary
// equivalence.

#include "stinespring/types.hpp"
#include "stinespring/numerics.hpp"
#include "stinespring/cstar.hpp"
#include "stinespring/hilbert_module.hpp"
#include "stinespring/dilation.hpp"
#include "stinespring/generators.hpp"
#include "stinespring/demo.hpp"
#include "stinespring/io.hpp"
