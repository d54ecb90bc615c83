x = int(input())
if x > 0:
    label = "positive"
elif x < 0:
    label = "negative"
else:
    label = "zero"
print(label)
