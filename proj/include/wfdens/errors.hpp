#pragma once

#include <stdexcept>

namespace wfdens {

//! Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

//! Adaptive quadrature could not meet its tolerance.
class QuadratureError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! A potential evaluated too close to a boundary singularity.
class SingularityError : public std::overflow_error
{
public:
  using std::overflow_error::overflow_error;
};

//! Model parameters that do not define a valid density.
class ParameterError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! Every Monte Carlo evaluation was clamped, so the estimate carries no
//! information.
class McDegeneracyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Two grids that cannot be brought onto a common support.
class GridError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! A numerical result that cannot be used (non-finite or non-positive
//! normalisation constant, for instance).
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace wfdens
