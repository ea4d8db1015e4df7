#pragma once

#include "pufcan/analysis.hpp"
#include "pufcan/attacks.hpp"
#include "pufcan/bus.hpp"
#include "pufcan/canframe.hpp"
#include "pufcan/drbg.hpp"
#include "pufcan/lwc/suite.hpp"
#include "pufcan/protocol/enrollment.hpp"
#include "pufcan/protocol/node.hpp"
#include "pufcan/protocol/server.hpp"
#include "pufcan/protocol/session_packet.hpp"
#include "pufcan/puf.hpp"
#include "pufcan/scenario.hpp"
