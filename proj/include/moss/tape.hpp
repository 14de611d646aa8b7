#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "moss/error.hpp"
#include "moss/graph.hpp"
#include "moss/method.hpp"

namespace moss {

/// One random choice: the role it fills ('v', 'u', 'w', 'r', 't') and the
/// chosen node's internal index.
struct TapeRecord {
  char label;
  NodeId value;

  friend bool operator==(const TapeRecord&, const TapeRecord&) = default;
};

/// Every choice made by one sampling run, trial after trial.
class Tape {
 public:
  Tape() = default;
  explicit Tape(Method method) : method_(method) {}

  Method method() const { return method_; }
  const std::vector<TapeRecord>& records() const { return records_; }
  std::size_t record_count() const { return records_.size(); }
  std::size_t per_trial() const { return trial_labels(method_).size(); }
  std::size_t trial_count() const { return records_.size() / per_trial(); }

  void push(char label, NodeId value) { records_.push_back({label, value}); }
  void append(const Tape& other) {
    if (other.method_ != method_) throw TapeError("cannot append tapes of different methods");
    records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  }
  void reserve_trials(std::size_t trials) { records_.reserve(trials * per_trial()); }

  /// Record `slot` of trial `trial`; throws if the tape is too short or the
  /// label does not match.
  NodeId at(std::size_t trial, std::size_t slot) const {
    const std::size_t i = trial * per_trial() + slot;
    if (i >= records_.size())
      throw TapeError("tape exhausted at trial " + std::to_string(trial) + " (" +
                      std::to_string(trial_count()) + " trials recorded)");
    const char want = trial_labels(method_)[slot];
    if (records_[i].label != want)
      throw TapeError("tape record " + std::to_string(i) + " has label '" + std::string(1, records_[i].label) +
                      "', expected '" + std::string(1, want) + "'");
    return records_[i].value;
  }

  /// Checks that the record count is a whole number of trials and every label
  /// sits in its expected slot.
  void validate() const {
    if (records_.size() % per_trial() != 0)
      throw TapeError("tape holds a partial trial (" + std::to_string(records_.size()) + " records)");
    for (std::size_t t = 0; t < trial_count(); ++t)
      for (std::size_t s = 0; s < per_trial(); ++s) (void)at(t, s);
  }

  friend bool operator==(const Tape&, const Tape&) = default;

 private:
  Method method_ = Method::kMoss4;
  std::vector<TapeRecord> records_;
};

/// Text format: a "# moss tape 1" line, then per tape a "section <method>
/// <trials>" line followed by one "<label> <node>" line per record.
inline void write_tapes(const std::vector<Tape>& tapes, std::ostream& out) {
  out << "# moss tape 1\n";
  for (const auto& tape : tapes) {
    out << "section " << to_string(tape.method()) << ' ' << tape.trial_count() << '\n';
    for (const auto& rec : tape.records()) out << rec.label << ' ' << rec.value << '\n';
  }
}

inline std::vector<Tape> read_tapes(std::istream& in) {
  std::vector<Tape> tapes;
  std::vector<std::size_t> expected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head == "section") {
      std::string method;
      std::size_t trials = 0;
      if (!(fields >> method >> trials)) throw ParseError("malformed tape section header", line_no);
      tapes.emplace_back(parse_method(method));
      tapes.back().reserve_trials(trials);
      expected.push_back(trials);
      continue;
    }
    if (tapes.empty()) throw ParseError("tape record before any section header", line_no);
    std::uint64_t value = 0;
    if (head.size() != 1 || !(fields >> value)) throw ParseError("malformed tape record", line_no);
    tapes.back().push(head[0], static_cast<NodeId>(value));
  }
  for (std::size_t i = 0; i < tapes.size(); ++i) {
    tapes[i].validate();
    if (tapes[i].trial_count() != expected[i])
      throw TapeError("tape section " + std::to_string(i) + " declares " + std::to_string(expected[i]) +
                      " trials but holds " + std::to_string(tapes[i].trial_count()));
  }
  return tapes;
}

inline void write_tapes_file(const std::vector<Tape>& tapes, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write tape file '" + path + "'");
  write_tapes(tapes, out);
}

inline std::vector<Tape> read_tapes_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tape file '" + path + "'");
  return read_tapes(in);
}

}  // namespace moss
