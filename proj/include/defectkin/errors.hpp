#pragma once

#include <stdexcept>
#include <string>

namespace defectkin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySubshift : public Error {
 public:
  EmptySubshift() : Error("empty subshift") {}
};

class NoChoicePoint : public Error {
 public:
  NoChoicePoint() : Error("no choice point: entropy is zero") {}
};

class BackgroundNotClosed : public Error {
 public:
  using Error::Error;
};

class MultipleDefects : public Error {
 public:
  MultipleDefects() : Error("multiple defects") {}
};

class NotAFunction : public Error {
 public:
  using Error::Error;
};

class InvalidMachine : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace defectkin
