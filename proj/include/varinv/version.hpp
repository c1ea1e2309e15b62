#pragma once

#define VARINV_VERSION "0.1.0"
