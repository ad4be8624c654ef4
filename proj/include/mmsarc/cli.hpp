#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmsarc::cli {

// Runs one verb. args excludes the program name. Returns the process exit
// code: 0 success, 1 validation or data error (one "error: <Kind>: ..." line
// on err), 2 unknown verb or malformed flags.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace mmsarc::cli
