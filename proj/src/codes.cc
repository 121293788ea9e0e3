#include "eqodds/codes.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqodds/errors.h"

#ifndef EQODDS_DATA_DIR
#define EQODDS_DATA_DIR "data"
#endif

namespace eqodds {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

CodeList::CodeList(std::string name, const std::vector<std::string>& codes)
    : name_(std::move(name)) {
  for (const std::string& raw : codes) {
    const std::string code(Trim(raw));
    if (code.empty()) continue;
    if (!codes_.insert(code).second) {
      throw ValidationError("code list '" + name_ + "' repeats code '" + code + "'");
    }
  }
  if (codes_.empty()) {
    throw ValidationError("code list '" + name_ + "' is empty");
  }
}

bool CodeList::Contains(std::string_view code) const {
  return codes_.find(Trim(code)) != codes_.end();
}

CodeList ParseCodeList(std::string name, std::string_view text) {
  std::vector<std::string> codes;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) codes.emplace_back(line);
    pos = end + 1;
  }
  return CodeList(std::move(name), codes);
}

CodeList LoadCodeList(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open code list '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCodeList(std::filesystem::path(path).stem().string(), buf.str());
}

CohortCodeLists LoadCohortCodeLists(const std::string& directory) {
  const std::filesystem::path dir(directory);
  return CohortCodeLists{
      LoadCodeList((dir / kCvdExclusionFile).string()),
      LoadCodeList((dir / kLipidLoweringFile).string()),
      LoadCodeList((dir / kAscvdEventsFile).string()),
      LoadCodeList((dir / kFatalChdFile).string()),
  };
}

std::string DefaultCodeListDirectory() { return EQODDS_DATA_DIR "/codes"; }

}  // namespace eqodds
