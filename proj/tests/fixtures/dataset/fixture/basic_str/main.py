# shout the word
word = "exec"
shout = word.upper() + "!"
print(shout)
