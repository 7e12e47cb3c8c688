#pragma once

#include "netcpd/error.hpp"
#include "netcpd/rng.hpp"
#include "netcpd/parallel.hpp"
#include "netcpd/text_io.hpp"
#include "netcpd/netseq.hpp"
#include "netcpd/linalg.hpp"
#include "netcpd/cusum.hpp"
#include "netcpd/records.hpp"
#include "netcpd/threshold.hpp"
#include "netcpd/distill.hpp"
#include "netcpd/localize.hpp"
#include "netcpd/simulate.hpp"
#include "netcpd/metrics.hpp"
#include "netcpd/detect.hpp"
