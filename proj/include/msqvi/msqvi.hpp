#pragma once

#include "msqvi/basis.hpp"
#include "msqvi/errors.hpp"
#include "msqvi/game.hpp"
#include "msqvi/learning/buffer.hpp"
#include "msqvi/learning/exploration.hpp"
#include "msqvi/learning/io.hpp"
#include "msqvi/learning/lp.hpp"
#include "msqvi/learning/ls.hpp"
#include "msqvi/learning/msqvi.hpp"
#include "msqvi/learning/poe.hpp"
#include "msqvi/learning/q0.hpp"
#include "msqvi/learning/simplex.hpp"
#include "msqvi/metrics.hpp"
#include "msqvi/oracle/lq.hpp"
#include "msqvi/oracle/tabular.hpp"
#include "msqvi/plant.hpp"
#include "msqvi/plants/glucose.hpp"
#include "msqvi/plants/lq_game.hpp"
#include "msqvi/plants/scenario.hpp"
#include "msqvi/policy.hpp"
#include "msqvi/qfunction.hpp"
