/*
 * Copyright (C) 2026 The angiograph authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#ifndef ANGIO__CORE__ERROR_HPP
#define ANGIO__CORE__ERROR_HPP

#include <stdexcept>
#include <string>

namespace angio {

//==============================================================================
/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//==============================================================================
/// An input violated a documented precondition or schema.
class ValidationError : public Error
{
public:
  using Error::Error;
};

//==============================================================================
/// A pipeline stage failed. `stage()` holds the stage letter, e.g. "d".
class StageError : public Error
{
public:
  StageError(std::string stage, const std::string& what)
  : Error("stage (" + stage + "): " + what),
    _stage(std::move(stage))
  {
  }

  const std::string& stage() const { return _stage; }

private:
  std::string _stage;
};

} // namespace angio

#endif // ANGIO__CORE__ERROR_HPP
