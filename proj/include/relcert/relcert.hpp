#pragma once

// Everything: groups, coset spaces, certificates, LP search, amenability,
// transfer constructions, persistence and scenarios.

#include "relcert/amenability.hpp"
#include "relcert/certificates.hpp"
#include "relcert/coset_space.hpp"
#include "relcert/graph.hpp"
#include "relcert/group.hpp"
#include "relcert/io.hpp"
#include "relcert/lp.hpp"
#include "relcert/lp_search.hpp"
#include "relcert/scenario.hpp"
#include "relcert/transfer.hpp"
