# SP Few-Shot - Model Tests
