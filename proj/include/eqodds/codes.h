#ifndef EQODDS_CODES_H_
#define EQODDS_CODES_H_

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace eqodds {

// A named set of clinical codes matched by exact string equality after
// trimming surrounding whitespace. No hierarchy expansion: child codes are
// enumerated explicitly in the shipped lists.
class CodeList {
 public:
  // Throws ValidationError if `codes` is empty or contains duplicates.
  CodeList(std::string name, const std::vector<std::string>& codes);

  const std::string& name() const { return name_; }
  bool Contains(std::string_view code) const;
  size_t size() const { return codes_.size(); }
  const std::set<std::string, std::less<>>& codes() const { return codes_; }

 private:
  std::string name_;
  std::set<std::string, std::less<>> codes_;
};

std::string_view Trim(std::string_view s);

// One code per line; blank lines and '#' comments ignored.
CodeList ParseCodeList(std::string name, std::string_view text);
CodeList LoadCodeList(const std::string& path);

// The four shipped lists used by cohort extraction.
struct CohortCodeLists {
  CodeList cvd_exclusion;   // ICD-9-CM, any time before index
  CodeList lipid_lowering;  // ATC, five years before index
  CodeList ascvd_events;    // ICD-9-CM, at or after index
  CodeList fatal_chd;       // ICD-9-CM, at or after index with death in 365 days
};

inline constexpr std::string_view kCvdExclusionFile = "cvd_exclusion.txt";
inline constexpr std::string_view kLipidLoweringFile = "lipid_lowering.txt";
inline constexpr std::string_view kAscvdEventsFile = "ascvd_events.txt";
inline constexpr std::string_view kFatalChdFile = "fatal_chd.txt";

CohortCodeLists LoadCohortCodeLists(const std::string& directory);

// Directory of the code lists shipped with the source tree.
std::string DefaultCodeListDirectory();

}  // namespace eqodds

#endif  // EQODDS_CODES_H_
