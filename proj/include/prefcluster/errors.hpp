#pragma once

#include <stdexcept>
#include <string>

namespace prefcluster {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class InputError : public Error { using Error::Error; };
class NumericError : public Error { using Error::Error; };
class EvaluationError : public Error { using Error::Error; };
class SamplingError : public Error { using Error::Error; };
class DegenerateDataError : public Error { using Error::Error; };
class AnalysisError : public Error { using Error::Error; };
class DetectionError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace prefcluster
