#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace lapse {

// Base class for every error raised by the planning core.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file is not valid JSON or does not follow the expected schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A trace or plan violates one of its data invariants. Carries the offending
// frame when one can be named.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what,
                          std::optional<int> frame = std::nullopt)
      : Error(frame ? what + " (frame " + std::to_string(*frame) + ")" : what),
        frame_(frame) {}

  std::optional<int> frame() const { return frame_; }

 private:
  std::optional<int> frame_;
};

class MissingLink : public Error {
 public:
  MissingLink(int src, int dst)
      : Error("no motion link between frames " + std::to_string(src) +
              " and " + std::to_string(dst)),
        src_(src),
        dst_(dst) {}

  int src() const { return src_; }
  int dst() const { return dst_; }

 private:
  int src_;
  int dst_;
};

class NoPath : public Error {
 public:
  using Error::Error;
};

class MiddleFrameMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyCoverage : public Error {
 public:
  explicit EmptyCoverage(int frame)
      : Error("crop center lies outside the panorama coverage of frame " +
              std::to_string(frame)),
        frame_(frame) {}

  int frame() const { return frame_; }

 private:
  int frame_;
};

}  // namespace lapse
