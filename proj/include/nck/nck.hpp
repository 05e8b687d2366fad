#pragma once

#include "equivalence.hpp"
#include "fixtures.hpp"
#include "formula.hpp"
#include "kripke.hpp"
#include "morphisms.hpp"
#include "proofs.hpp"
#include "semantics.hpp"
#include "transforms.hpp"
#include "validity.hpp"
