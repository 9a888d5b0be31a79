#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace mecchain {

/// Either a value or a failure description.
template <typename T, typename E>
class Outcome {
public:
    Outcome(T value) : data_(std::in_place_index<0>, std::move(value)) {}
    Outcome(E error) : data_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return data_.index() == 0; }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw std::logic_error("Outcome::value() called on a failure");
        return std::get<0>(data_);
    }
    T&& value() && {
        if (!ok()) throw std::logic_error("Outcome::value() called on a failure");
        return std::get<0>(std::move(data_));
    }
    const E& error() const {
        if (ok()) throw std::logic_error("Outcome::error() called on a success");
        return std::get<1>(data_);
    }

    const T& operator*() const& { return value(); }
    const T* operator->() const { return &value(); }

private:
    std::variant<T, E> data_;
};

} // namespace mecchain
