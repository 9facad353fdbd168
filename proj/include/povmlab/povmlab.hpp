#ifndef POVMLAB_POVMLAB_HPP
#define POVMLAB_POVMLAB_HPP

// Umbrella header: finite-dimensional POV-measure toolkit for measurement
// schemes, objectification audits, and conditional state assignment.

#include "povmlab/coexistence.hpp"
#include "povmlab/io.hpp"
#include "povmlab/layout.hpp"
#include "povmlab/matrix.hpp"
#include "povmlab/models.hpp"
#include "povmlab/povm.hpp"
#include "povmlab/sampling.hpp"
#include "povmlab/scenario.hpp"
#include "povmlab/scheme.hpp"
#include "povmlab/tensor.hpp"

#endif  // POVMLAB_POVMLAB_HPP
