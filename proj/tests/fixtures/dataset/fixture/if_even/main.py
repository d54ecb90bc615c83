def is_even(k):
    if k % 2 == 0:
        return True
    return False


print(is_even(14))
