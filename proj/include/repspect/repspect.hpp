#pragma once

#include "repspect/error.hpp"
#include "repspect/linalg.hpp"
#include "repspect/random.hpp"
#include "repspect/group_core.hpp"
#include "repspect/representation.hpp"
#include "repspect/commutant.hpp"
#include "repspect/moments.hpp"
#include "repspect/config.hpp"
#include "repspect/analysis.hpp"
#include "repspect/report.hpp"
