int placeholder_test_evaluation;
