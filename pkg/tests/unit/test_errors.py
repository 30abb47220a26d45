from framework.error_code.errors import DetailedError, ErrorCode, argument_error, structure_error


class TestDetailedError:

    def test_argument_error_is_usage_error(self):
        error = argument_error("k must be at least 1", k=0)

        assert error.code == ErrorCode.VALIDATION_ERROR
        assert error.is_usage_error()
        assert error.context == {'k': 0}

    def test_structure_error_is_runtime_error(self):
        error = structure_error("input is not a tree")

        assert not error.is_usage_error()
        assert str(error) == "input is not a tree"

    def test_messages_fall_back_to_user_message(self):
        error = DetailedError(ErrorCode.PARSE_ERROR, "bad line")

        assert error.developer_message == "bad line"
        assert error.internal_message == "bad line"
        assert error.message == "bad line"

    def test_wrap_keeps_detailed_error(self):
        error = structure_error("input is not a tree")

        assert DetailedError.wrap(error) is error

    def test_wrap_foreign_exception_as_unknown_error(self):
        cause = RuntimeError("clock broke")

        wrapped = DetailedError.wrap(cause)

        assert wrapped.code == ErrorCode.UNKNOWN_ERROR
        assert wrapped.cause is cause
        assert not wrapped.is_usage_error()
        assert wrapped.to_dict() == {
            "error": True,
            "code": 99999,
            "message": "unexpected error: clock broke",
            "context": {'type': "RuntimeError"},
        }
