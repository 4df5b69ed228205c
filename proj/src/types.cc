#include "wetmm/types.h"

#include <string>

namespace wetmm {

std::string_view to_string(Detector d) {
  return d == Detector::kZf ? "zf" : "mrc";
}

std::string_view to_string(System s) {
  switch (s) {
    case System::kWetMm:
      return "wetmm";
    case System::kIdeal:
      return "ideal";
    case System::kOpMm:
      return "opmm";
  }
  return "unknown";
}

Detector parse_detector(std::string_view text) {
  if (text == "zf") return Detector::kZf;
  if (text == "mrc") return Detector::kMrc;
  throw InvalidParameter("unknown detector '" + std::string(text) +
                         "' (expected zf or mrc)");
}

System parse_system(std::string_view text) {
  if (text == "wetmm") return System::kWetMm;
  if (text == "ideal") return System::kIdeal;
  if (text == "opmm") return System::kOpMm;
  throw InvalidParameter("unknown system '" + std::string(text) +
                         "' (expected wetmm, ideal or opmm)");
}

}  // namespace wetmm
