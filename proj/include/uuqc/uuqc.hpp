#pragma once

#include "uuqc/channels.hpp"
#include "uuqc/densecode.hpp"
#include "uuqc/entanglement.hpp"
#include "uuqc/io.hpp"
#include "uuqc/linalg.hpp"
#include "uuqc/qec.hpp"
#include "uuqc/random.hpp"
#include "uuqc/subspace.hpp"
#include "uuqc/unambiguous.hpp"
#include "uuqc/weyl.hpp"
