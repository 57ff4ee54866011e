#ifndef ERGO_TESTS_TESTUTIL_HPP
#define ERGO_TESTS_TESTUTIL_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ergo/parser.hpp"
#include "ergo/recon.hpp"

#ifndef ERGO_CORPUS_DIR
#define ERGO_CORPUS_DIR "tests/corpus"
#endif

namespace testutil {

inline std::string corpus_path(const std::string& name) {
  return std::string(ERGO_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_source(const std::string& name) {
  return read_file(corpus_path(name));
}

inline ergo::Signature parse_corpus(const std::string& name) {
  return ergo::parse_signature(corpus_source(name));
}

struct CorpusEntry {
  const char* file;
  ergo::CostModel cost;
};

// Every corpus area with the cost model its potential annotations assume.
inline std::vector<CorpusEntry> corpus_entries() {
  return {
      {"arithmetic.txt", ergo::CostModel::none()},
      {"integers.txt", ergo::CostModel::none()},
      {"linlam.txt", ergo::CostModel::none()},
      {"list.txt", ergo::CostModel::send()},
      {"primes.txt", ergo::CostModel::none()},
      {"queue.txt", ergo::CostModel::send()},
      {"queue_linear.txt", ergo::CostModel::send()},
      {"segments.txt", ergo::CostModel::none()},
      {"ternary.txt", ergo::CostModel::none()},
      {"theorems.txt", ergo::CostModel::none()},
      {"tries.txt", ergo::CostModel::send()},
  };
}

}  // namespace testutil

#endif
