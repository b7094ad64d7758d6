#pragma once

#include "foonlink/broker/server.hpp"
#include "foonlink/broker/sim.hpp"
#include "foonlink/error.hpp"
#include "foonlink/foon/dot.hpp"
#include "foonlink/foon/format.hpp"
#include "foonlink/foon/types.hpp"
#include "foonlink/foon/universal.hpp"
#include "foonlink/foon/validate.hpp"
#include "foonlink/foon/world.hpp"
#include "foonlink/kb/industrial.hpp"
#include "foonlink/ngsi/client.hpp"
#include "foonlink/ngsi/entities.hpp"
#include "foonlink/pipeline/roundtrip.hpp"
#include "foonlink/recognition/detection.hpp"
#include "foonlink/recognition/distance.hpp"
#include "foonlink/recognition/matcher.hpp"
#include "foonlink/recognition/simulate.hpp"
