#include "hdproto/csv.hpp"

#include <cstdio>

namespace hdp {

std::string session_csv_row(const SessionResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f,%.6f", r.session, r.class_count, r.accuracy,
                r.diagnostics.crosstalk.mean_abs, r.diagnostics.crosstalk.max_abs);
  return buf;
}

void write_session_csv(std::ostream& out, const std::vector<SessionResult>& results) {
  out << kSessionCsvHeader << '\n';
  for (const SessionResult& r : results) out << session_csv_row(r) << '\n';
}

}  // namespace hdp
