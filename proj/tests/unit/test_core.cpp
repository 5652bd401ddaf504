#include <gtest/gtest.h>

#include <cmath>

#include "squish/core.hpp"

using namespace squish;

namespace {

Schema one_cat(std::size_t k) { return Schema({{"c", CategoricalKind{k, {}}, 0.0}}); }

Schema numeric(double tol) { return Schema({{"x", NumericKind{false, std::nullopt}, tol}}); }

}  // namespace

TEST(Schema, RejectsDuplicateNames) {
  EXPECT_THROW(Schema({{"a", CategoricalKind{2, {}}, 0.0}, {"a", CategoricalKind{2, {}}, 0.0}}), ConfigError);
}

TEST(Schema, RejectsToleranceOnExactKinds) {
  EXPECT_THROW(Schema({{"a", CategoricalKind{2, {}}, 0.5}}), ConfigError);
  EXPECT_THROW(Schema({{"s", StringKind{}, 0.5}}), ConfigError);
  EXPECT_THROW(numeric(-1.0), ConfigError);
}

TEST(Schema, RejectsBadKinds) {
  EXPECT_THROW(one_cat(0), ConfigError);
  EXPECT_THROW(Schema({{"x", NumericKind{false, Range{2.0, 1.0}}, 0.1}}), ConfigError);
  EXPECT_THROW(Schema({{"x", NumericKind{false, Range{1.0, 1.0}}, 0.1}}), ConfigError);
}

TEST(Schema, IndexOf) {
  const Schema s({{"a", CategoricalKind{2, {}}, 0.0}, {"b", StringKind{}, 0.0}});
  EXPECT_EQ(s.index_of("b"), 1u);
  EXPECT_FALSE(s.index_of("z"));
}

TEST(ValidateTuple, InRangeIndex) { EXPECT_FALSE(validate_tuple(one_cat(2), {Cat{1}})); }

TEST(ValidateTuple, IndexOutOfRange) {
  const auto v = validate_tuple(one_cat(2), {Cat{2}});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->column, 0u);
}

TEST(ValidateTuple, Arity) {
  const Schema s({{"a", CategoricalKind{2, {}}, 0.0}, {"b", CategoricalKind{2, {}}, 0.0}});
  EXPECT_TRUE(validate_tuple(s, {Cat{0}}));
}

TEST(ValidateTuple, VariantMismatchNamesColumn) {
  const Schema s({{"a", CategoricalKind{2, {}}, 0.0}, {"b", StringKind{}, 0.0}});
  const auto v = validate_tuple(s, {Cat{0}, 1.5});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->column, 1u);
}

TEST(ValidateTuple, IntegerAndLengthChecks) {
  const Schema s({{"i", NumericKind{true, std::nullopt}, 0.0}, {"s", StringKind{3}, 0.0}});
  EXPECT_FALSE(validate_tuple(s, {4.0, std::string("abc")}));
  EXPECT_TRUE(validate_tuple(s, {4.5, std::string("abc")}));
  EXPECT_TRUE(validate_tuple(s, {4.0, std::string("abcd")}));
  EXPECT_TRUE(validate_tuple(s, Tuple{std::nan(""), std::string("")}));
}

TEST(Dataset, AddValidates) {
  Dataset d{one_cat(2), {}};
  d.add({Cat{1}});
  EXPECT_THROW(d.add({Cat{5}}), ConfigError);
  EXPECT_EQ(d.size(), 1u);
}

TEST(Closeness, WithinTolerance) { EXPECT_TRUE(closeness_check({1.00}, {1.009}, numeric(0.01))); }

TEST(Closeness, ExceedsTolerance) { EXPECT_FALSE(closeness_check({1.00}, {1.02}, numeric(0.01))); }

TEST(Closeness, InclusiveBoundary) { EXPECT_TRUE(closeness_check({0.5}, {0.75}, numeric(0.25))); }

TEST(Closeness, CategoricalExact) {
  EXPECT_TRUE(closeness_check({Cat{3}}, {Cat{3}}, one_cat(5)));
  EXPECT_FALSE(closeness_check({Cat{3}}, {Cat{2}}, one_cat(5)));
}

TEST(Closeness, StringsExact) {
  const Schema s({{"s", StringKind{}, 0.0}});
  EXPECT_TRUE(closeness_check({std::string("ab")}, {std::string("ab")}, s));
  EXPECT_FALSE(closeness_check({std::string("ab")}, {std::string("ab ")}, s));
}

TEST(Closeness, ReflexiveAndSymmetric) {
  const Schema s({{"c", CategoricalKind{4, {}}, 0.0}, {"x", NumericKind{}, 0.1}, {"s", StringKind{}, 0.0}});
  const Tuple a{Cat{2}, 3.0, std::string("q")};
  const Tuple b{Cat{2}, 3.08, std::string("q")};
  const Tuple c{Cat{2}, 3.2, std::string("q")};
  EXPECT_TRUE(closeness_check(a, a, s));
  EXPECT_EQ(closeness_check(a, b, s), closeness_check(b, a, s));
  EXPECT_EQ(closeness_check(a, c, s), closeness_check(c, a, s));
  EXPECT_FALSE(closeness_check(a, c, s));
}

TEST(Value, ToString) {
  EXPECT_EQ(to_string(Value{Cat{3}}), "Cat(3)");
  EXPECT_EQ(to_string(Value{0.5}), "Num(0.5)");
  EXPECT_EQ(to_string(Value{std::string("x")}), "Str(\"x\")");
}
