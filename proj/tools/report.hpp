#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace stratocli {

// Minimal JSON emitter for the report documents. Keys keep their emission
// order and every floating value is printed through one fixed format, so a
// rerun with the same inputs produces the same bytes.
class ReportWriter {
 public:
  std::string take() {
    close_all();
    return std::move(out_);
  }

  ReportWriter& begin_object() {
    separator();
    out_ += '{';
    stack_.push_back('}');
    fresh_ = true;
    return *this;
  }
  ReportWriter& begin_array() {
    separator();
    out_ += '[';
    stack_.push_back(']');
    fresh_ = true;
    return *this;
  }
  ReportWriter& end() {
    out_ += stack_.back();
    stack_.pop_back();
    fresh_ = false;
    return *this;
  }

  ReportWriter& key(const std::string& name) {
    separator();
    quote(name);
    out_ += ':';
    pending_value_ = true;
    return *this;
  }

  ReportWriter& value(const std::string& v) {
    separator();
    quote(v);
    return *this;
  }
  ReportWriter& value(const char* v) { return value(std::string(v)); }
  ReportWriter& value(double v) {
    separator();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ += buf;
    return *this;
  }
  ReportWriter& value(long v) {
    separator();
    out_ += std::to_string(v);
    return *this;
  }
  ReportWriter& value(int v) { return value(static_cast<long>(v)); }
  ReportWriter& value(std::size_t v) { return value(static_cast<long>(v)); }
  ReportWriter& value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    return *this;
  }

  ReportWriter& field(const std::string& name, const std::string& v) {
    return key(name).value(v);
  }
  ReportWriter& field(const std::string& name, const char* v) {
    return key(name).value(v);
  }
  ReportWriter& field(const std::string& name, double v) { return key(name).value(v); }
  ReportWriter& field(const std::string& name, long v) { return key(name).value(v); }
  ReportWriter& field(const std::string& name, int v) { return key(name).value(v); }
  ReportWriter& field(const std::string& name, std::size_t v) {
    return key(name).value(v);
  }
  ReportWriter& field(const std::string& name, bool v) { return key(name).value(v); }

 private:
  void separator() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!fresh_ && !stack_.empty()) out_ += ',';
    fresh_ = false;
  }

  void quote(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default: out_ += c;
      }
    }
    out_ += '"';
  }

  void close_all() {
    while (!stack_.empty()) end();
    out_ += '\n';
  }

  std::string out_;
  std::string stack_;
  bool fresh_ = true;
  bool pending_value_ = false;
};

}  // namespace stratocli
