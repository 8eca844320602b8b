#pragma once

#include "certquad/adaptive.hpp"
#include "certquad/compensated.hpp"
#include "certquad/errors.hpp"
#include "certquad/expr.hpp"
#include "certquad/kernel.hpp"
#include "certquad/probability.hpp"
#include "certquad/quadrature.hpp"
#include "certquad/verify.hpp"
