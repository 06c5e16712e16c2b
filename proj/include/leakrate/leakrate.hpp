#pragma once

#include "leakrate/case1.hpp"
#include "leakrate/case2.hpp"
#include "leakrate/channel.hpp"
#include "leakrate/common.hpp"
#include "leakrate/oracle.hpp"
#include "leakrate/report.hpp"
#include "leakrate/specfun.hpp"
