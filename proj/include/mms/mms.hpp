#ifndef MMS_MMS_HPP
#define MMS_MMS_HPP

#include "mms/batch.hpp"
#include "mms/chains.hpp"
#include "mms/common.hpp"
#include "mms/diagnostics.hpp"
#include "mms/enumerate.hpp"
#include "mms/evaluation.hpp"
#include "mms/generators.hpp"
#include "mms/instance.hpp"
#include "mms/io.hpp"
#include "mms/rng.hpp"

#endif  // MMS_MMS_HPP
