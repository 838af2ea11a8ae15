#pragma once

// Umbrella header for the whole library.

#include "formal/error.hpp"
#include "formal/rational.hpp"
#include "formal/multidegree.hpp"
#include "formal/upoly.hpp"
#include "formal/jet.hpp"
#include "formal/matrix.hpp"
#include "formal/division.hpp"
#include "formal/vector_field.hpp"
#include "formal/diffeo.hpp"
#include "formal/resonance.hpp"
#include "formal/normal_form.hpp"
#include "formal/algebra.hpp"
#include "formal/forms.hpp"
#include "formal/literal.hpp"
