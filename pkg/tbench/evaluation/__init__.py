# SP Few-Shot - Evaluation Tests
