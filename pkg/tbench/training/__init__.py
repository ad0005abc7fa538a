# SP Few-Shot - Training Tests
