namespace roax {}
