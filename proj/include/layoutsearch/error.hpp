#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace layoutsearch {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an operation needs text components and the page has none.
class NoTextContent : public Error {
 public:
  NoTextContent() : Error("no text content") {}
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DuplicateDocument : public Error {
 public:
  explicit DuplicateDocument(const std::string& doc_id)
      : Error("document already indexed: " + doc_id) {}
};

class QueryError : public Error {
 public:
  using Error::Error;
};

// Corpus file error carrying the 1-based line number of the offending record.
class CorpusFormatError : public Error {
 public:
  CorpusFormatError(std::size_t line, const std::string& what)
      : Error("corpus line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace layoutsearch
