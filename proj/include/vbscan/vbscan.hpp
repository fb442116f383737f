#pragma once

#include "vbscan/address.hpp"
#include "vbscan/bundled.hpp"
#include "vbscan/error.hpp"
#include "vbscan/fb.hpp"
#include "vbscan/link.hpp"
#include "vbscan/memory.hpp"
#include "vbscan/program.hpp"
#include "vbscan/report/diff.hpp"
#include "vbscan/report/json.hpp"
#include "vbscan/report/text.hpp"
#include "vbscan/runtime.hpp"
#include "vbscan/runtime_link.hpp"
#include "vbscan/scan_types.hpp"
#include "vbscan/scanner/attack.hpp"
#include "vbscan/scanner/oracle.hpp"
#include "vbscan/scanner/pointer_probe.hpp"
#include "vbscan/scanner/scanner.hpp"
#include "vbscan/symbols.hpp"
#include "vbscan/wire/client.hpp"
#include "vbscan/wire/codec.hpp"
#include "vbscan/wire/server.hpp"
#include "vbscan/wire/socket.hpp"
