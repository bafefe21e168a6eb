#pragma once

#include "gtube/errors.hpp"
#include "gtube/scalar.hpp"
#include "gtube/poly.hpp"
#include "gtube/tensor.hpp"
#include "gtube/tensor_ops.hpp"
#include "gtube/connection.hpp"
#include "gtube/metric.hpp"
#include "gtube/jets.hpp"
#include "gtube/integrability.hpp"
#include "gtube/sampling.hpp"
