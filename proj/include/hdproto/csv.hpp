#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hdproto/session.hpp"

namespace hdp {

inline constexpr const char* kSessionCsvHeader =
    "session,classes,accuracy,mean_abs_offdiag_cos,max_abs_offdiag_cos";

std::string session_csv_row(const SessionResult& r);
void write_session_csv(std::ostream& out, const std::vector<SessionResult>& results);

}  // namespace hdp
