#pragma once

#include <stdexcept>
#include <string>

namespace roadchat {

/// Base of every domain error. `code()` is the stable name used in API replies.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* code() const noexcept { return "Error"; }
};

#define ROADCHAT_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    const char* code() const noexcept override { return #Name; }     \
  };

// Precondition violations on public operations.
ROADCHAT_DEFINE_ERROR(InvalidArgument)

ROADCHAT_DEFINE_ERROR(BackendUnavailable)
ROADCHAT_DEFINE_ERROR(UnparseableReply)
ROADCHAT_DEFINE_ERROR(UnknownPlace)
ROADCHAT_DEFINE_ERROR(FetchFailed)
ROADCHAT_DEFINE_ERROR(ParseError)
ROADCHAT_DEFINE_ERROR(EmptyNetwork)
ROADCHAT_DEFINE_ERROR(UnknownEdge)
ROADCHAT_DEFINE_ERROR(LastLane)
ROADCHAT_DEFINE_ERROR(NoPath)
ROADCHAT_DEFINE_ERROR(NetworkTooSmall)
ROADCHAT_DEFINE_ERROR(Oversaturated)
ROADCHAT_DEFINE_ERROR(NoSignals)
ROADCHAT_DEFINE_ERROR(InvalidRoute)
ROADCHAT_DEFINE_ERROR(UnknownRun)
ROADCHAT_DEFINE_ERROR(UnknownSession)

#undef ROADCHAT_DEFINE_ERROR

}  // namespace roadchat
